fn main() {
    std::process::exit(sdquant_cli::run(std::env::args_os()));
}
