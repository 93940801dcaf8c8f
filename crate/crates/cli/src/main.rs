fn main() {
    std::process::exit(hullknn_cli::run(std::env::args_os()));
}
