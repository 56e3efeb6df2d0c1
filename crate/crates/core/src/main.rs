fn main() {
    std::process::exit(corner_liouville::cli::run());
}
