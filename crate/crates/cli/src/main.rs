fn main() {
    std::process::exit(mixnet_cli::run(std::env::args_os()));
}
