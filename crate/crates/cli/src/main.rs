fn main() {
    std::process::exit(latshell_cli::run(std::env::args_os()));
}
