fn main() {
    std::process::exit(dvs_shotnoise::cli::cli_main(std::env::args_os()));
}
