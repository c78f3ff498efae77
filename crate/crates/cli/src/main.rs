fn main() {
    let out = enriq_cli::run(std::env::args());
    println!("{}", out.text);
    std::process::exit(out.code);
}
