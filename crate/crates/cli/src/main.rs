fn main() {
    std::process::exit(emubench_cli::run(std::env::args_os()));
}
