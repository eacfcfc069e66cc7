/// Ordered typing context. Later bindings shadow earlier ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeEnv<T> {
    bindings: Vec<(String, T)>,
}

impl<T> Default for TypeEnv<T> {
    fn default() -> Self {
        TypeEnv {
            bindings: Vec::new(),
        }
    }
}

impl<T> TypeEnv<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lookup(&self, name: &str) -> Option<&T> {
        self.bindings
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn push(&mut self, name: impl Into<String>, ty: T) {
        self.bindings.push((name.into(), ty));
    }

    pub fn pop(&mut self) -> Option<(String, T)> {
        self.bindings.pop()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &T)> {
        self.bindings.iter().map(|(n, t)| (n.as_str(), t))
    }

    /// Runs `f` with `name : ty` in scope.
    pub fn with<R>(&mut self, name: &str, ty: T, f: impl FnOnce(&mut Self) -> R) -> R {
        self.push(name, ty);
        let out = f(self);
        self.pop();
        out
    }
}

impl<T: Clone> TypeEnv<T> {
    pub fn extended(&self, name: impl Into<String>, ty: T) -> Self {
        let mut next = self.clone();
        next.push(name, ty);
        next
    }
}

impl<T, S: Into<String>> FromIterator<(S, T)> for TypeEnv<T> {
    fn from_iter<I: IntoIterator<Item = (S, T)>>(iter: I) -> Self {
        TypeEnv {
            bindings: iter.into_iter().map(|(n, t)| (n.into(), t)).collect(),
        }
    }
}
