//! `spi <command>` is shorthand for `hyll spi <command>`.

fn main() {
    let mut args: Vec<String> = std::env::args().collect();
    args.insert(1, "spi".to_string());
    std::process::exit(hyll_cli::main_on_big_stack(args));
}
