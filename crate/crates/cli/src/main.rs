fn main() {
    std::process::exit(spiralemb_cli::run(std::env::args()));
}
