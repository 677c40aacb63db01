fn main() {
    std::process::exit(rajchman::cli::main_entry());
}
