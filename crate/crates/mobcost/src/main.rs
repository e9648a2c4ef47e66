fn main() {
    std::process::exit(mobcost::cli::main());
}
