fn main() {
    std::process::exit(bpdn_testgen::cli::run(std::env::args_os()));
}
