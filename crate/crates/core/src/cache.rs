//! Process-wide cache for precomputed tables.
//!
//! Readers share one `RwLock`; a missing entry is built outside the lock and the
//! first insert wins, so concurrent builders of the same key are harmless.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

type Key = (TypeId, &'static str, u64, u64);
type Store = RwLock<HashMap<Key, Arc<dyn Any + Send + Sync>>>;

fn store() -> &'static Store {
    static STORE: OnceLock<Store> = OnceLock::new();
    STORE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub(crate) fn get_or_build<V, F>(tag: &'static str, a: u64, b: u64, build: F) -> Arc<V>
where
    V: Send + Sync + 'static,
    F: FnOnce() -> V,
{
    let key = (TypeId::of::<V>(), tag, a, b);
    if let Some(v) = store().read().expect("cache lock poisoned").get(&key) {
        return Arc::clone(v).downcast::<V>().expect("cache type mismatch");
    }
    let built: Arc<dyn Any + Send + Sync> = Arc::new(build());
    let mut guard = store().write().expect("cache lock poisoned");
    let entry = guard.entry(key).or_insert(built);
    Arc::clone(entry).downcast::<V>().expect("cache type mismatch")
}
