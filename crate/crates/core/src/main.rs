fn main() {
    std::process::exit(nepswalk::cli::run(std::env::args_os()));
}
