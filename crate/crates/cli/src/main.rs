fn main() {
    std::process::exit(swapnet_cli::run(std::env::args_os()));
}
