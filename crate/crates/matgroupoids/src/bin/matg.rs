fn main() {
    std::process::exit(matgroupoids::cli::run());
}
