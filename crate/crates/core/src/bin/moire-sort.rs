fn main() {
    let code = moire_sort::cli::run(std::env::args_os(), &mut std::io::stdout().lock());
    std::process::exit(code);
}
