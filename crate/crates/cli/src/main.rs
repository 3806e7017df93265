use clap::Parser;

fn main() {
    let cli = match lenscount_cli::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap exits with 2 on usage errors, which the exit-code contract
            // reserves for uncertified results
            let _ = err.print();
            std::process::exit(if err.use_stderr() {
                lenscount_cli::EXIT_USAGE
            } else {
                lenscount_cli::EXIT_OK
            });
        }
    };
    std::process::exit(lenscount_cli::run(cli));
}
