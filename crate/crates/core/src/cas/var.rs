use once_cell::sync::Lazy;
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Mutex;

/// Names that are treated as parameters rather than chart coordinates.
pub const PARAMETERS: [&str; 3] = ["t", "a0", "a1"];

#[derive(Debug)]
struct VarInfo {
    name: &'static str,
    param: bool,
    prefix: &'static str,
    index: Option<u64>,
}

static INTERNER: Lazy<Mutex<HashMap<String, &'static VarInfo>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// An interned variable. Cheap to copy and compare.
#[derive(Clone, Copy)]
pub struct Var(&'static VarInfo);

impl Var {
    pub fn new(name: &str) -> Var {
        let mut table = INTERNER.lock().expect("variable interner poisoned");
        if let Some(info) = table.get(name) {
            return Var(info);
        }
        let name: &'static str = Box::leak(name.to_string().into_boxed_str());
        let split = name
            .find(|c: char| c.is_ascii_digit())
            .filter(|&i| name[i..].chars().all(|c| c.is_ascii_digit()))
            .unwrap_or(name.len());
        let index = name[split..].parse::<u64>().ok();
        let info: &'static VarInfo = Box::leak(Box::new(VarInfo {
            name,
            param: PARAMETERS.contains(&name),
            prefix: &name[..split],
            index,
        }));
        table.insert(name.to_string(), info);
        Var(info)
    }

    pub fn name(&self) -> &'static str {
        self.0.name
    }

    pub fn is_parameter(&self) -> bool {
        self.0.param
    }

    fn key(&self) -> (bool, &'static str, Option<u64>, &'static str) {
        (self.0.param, self.0.prefix, self.0.index, self.0.name)
    }
}

pub fn is_parameter_name(name: &str) -> bool {
    PARAMETERS.contains(&name)
}

impl PartialEq for Var {
    fn eq(&self, other: &Var) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.0 as *const VarInfo).hash(state)
    }
}

/// Global variable order: coordinates before parameters, then by name with
/// numeric suffixes compared as numbers. Smaller means more significant.
impl Ord for Var {
    fn cmp(&self, other: &Var) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Var) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0.name)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        let a = Var::new("x9");
        let b = Var::new("x9");
        assert_eq!(a, b);
        assert_eq!(a.name(), "x9");
    }

    #[test]
    fn order_puts_parameters_last() {
        let x2 = Var::new("x2");
        let x10 = Var::new("x10");
        let y1 = Var::new("y1");
        let t = Var::new("t");
        assert!(x2 < x10);
        assert!(x10 < y1);
        assert!(y1 < t);
        assert!(t.is_parameter());
        assert!(!x2.is_parameter());
    }
}
