fn main() {
    std::process::exit(kary_cli::run(std::env::args_os()));
}
