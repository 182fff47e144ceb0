fn main() {
    std::process::exit(asz_cli::run(std::env::args_os()));
}
