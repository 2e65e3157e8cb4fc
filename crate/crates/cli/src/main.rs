fn main() {
    std::process::exit(ppturbo_cli::run(std::env::args_os()));
}
