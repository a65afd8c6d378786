fn main() {
    std::process::exit(zbw_cli::run(std::env::args_os()));
}
