fn main() {
    std::process::exit(capfb_cli::run());
}
