fn main() {
    std::process::exit(mhd_bl::cli::main());
}
