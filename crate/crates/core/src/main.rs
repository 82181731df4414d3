fn main() {
    std::process::exit(coupled_pm::cli::run_from(std::env::args_os()));
}
