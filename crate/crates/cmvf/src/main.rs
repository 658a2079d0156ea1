fn main() {
    std::process::exit(cmvf::pipeline::cli_main());
}
