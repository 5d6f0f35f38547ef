use clap::Parser;

fn main() {
    let cli = weylbound_cli::Cli::parse();
    match weylbound_cli::run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
