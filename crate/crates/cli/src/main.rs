fn main() {
    // populated once the core crate lands
}
