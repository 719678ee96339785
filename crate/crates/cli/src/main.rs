fn main() {
    std::process::exit(weighted_cuntz_cli::run())
}
