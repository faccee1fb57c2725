fn main() {
    std::process::exit(hyll_cli::main_on_big_stack(std::env::args().collect()));
}
