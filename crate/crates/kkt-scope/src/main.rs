fn main() {
    std::process::exit(kkt_scope::cli::run(std::env::args_os()));
}
