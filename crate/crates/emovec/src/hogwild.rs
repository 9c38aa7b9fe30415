//! Shared-parameter cell for lock-free parallel SGD.

use std::cell::UnsafeCell;
use std::sync::Arc;

/// Reference-counted cell that hands out overlapping mutable access to
/// one value from many threads, in the style of Hogwild parallel SGD:
/// workers update shared parameter rows without locking and the training
/// algorithm tolerates the resulting races.
///
/// This deliberately subverts the usual aliasing rules, so it is only
/// suitable for plain numeric parameter stores. Nothing outside training
/// may rely on synchronized access; once training finishes, take the
/// value back with [`Hogwild::into_inner`].
#[derive(Debug)]
pub struct Hogwild<T>(Arc<UnsafeCell<T>>);

impl<T> Clone for Hogwild<T> {
    fn clone(&self) -> Self {
        Hogwild(Arc::clone(&self.0))
    }
}

impl<T> Hogwild<T> {
    pub fn new(value: T) -> Self {
        Hogwild(Arc::new(UnsafeCell::new(value)))
    }

    pub fn get(&self) -> &T {
        unsafe { &*self.0.get() }
    }

    /// Mutable access without exclusivity. Concurrent callers race on the
    /// contents; that is the contract.
    #[allow(clippy::mut_from_ref)]
    pub fn get_mut(&self) -> &mut T {
        unsafe { &mut *self.0.get() }
    }

    /// Recovers the value. Panics if other clones are still alive.
    pub fn into_inner(self) -> T {
        Arc::try_unwrap(self.0)
            .ok()
            .expect("all Hogwild clones must be dropped before into_inner")
            .into_inner()
    }
}

unsafe impl<T: Send> Send for Hogwild<T> {}
unsafe impl<T: Send> Sync for Hogwild<T> {}
