pub mod cli;
pub mod error;
pub mod exactnum;
pub mod neps;
pub mod report;
pub mod spectral;
pub mod transfer;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            mod $name {}
        };
    }

    chapter!(introduction, "introduction.md");
    chapter!(exact_arithmetic, "exact-arithmetic.md");
    chapter!(neps, "neps.md");
    chapter!(spectra, "spectra.md");
    chapter!(state_transfer, "state-transfer.md");
    chapter!(pgst, "pgst.md");
    chapter!(products, "products.md");
    chapter!(cli, "cli.md");
}
