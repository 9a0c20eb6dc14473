fn main() {
    std::process::exit(oibc_cli::run(std::env::args_os()));
}
