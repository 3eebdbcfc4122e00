fn main() {
    std::process::exit(accperc::cli::main());
}
