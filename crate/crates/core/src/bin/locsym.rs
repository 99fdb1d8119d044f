fn main() {
    std::process::exit(locsym::cli::run(std::env::args_os()));
}
