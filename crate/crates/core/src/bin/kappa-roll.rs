fn main() {
    std::process::exit(kappa_roll::cli::run(std::env::args_os()));
}
