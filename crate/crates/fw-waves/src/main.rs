fn main() {
    std::process::exit(fw_waves::cli::run(std::env::args_os()));
}
