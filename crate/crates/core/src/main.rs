fn main() {
    std::process::exit(homgeo::cli::run(std::env::args_os()));
}
