fn main() {
    std::process::exit(dga_cli::run(std::env::args_os()));
}
