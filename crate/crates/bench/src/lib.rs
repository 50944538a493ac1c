//! Shared fixtures for the benchmark targets.

use umbilic_core::catalog::{self, CatalogEntry};

pub fn sphere() -> CatalogEntry {
    catalog::lookup("sphere2").expect("catalog entry")
}

pub fn ellipsoid() -> CatalogEntry {
    catalog::lookup("ellipsoid-1-1-2").expect("catalog entry")
}

pub fn veronese() -> CatalogEntry {
    catalog::lookup("veronese-in-S4").expect("catalog entry")
}
