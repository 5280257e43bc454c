pub mod tree_expansion;
