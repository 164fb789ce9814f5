fn main() {
    std::process::exit(kd_cli::cli::run(std::env::args_os()));
}
