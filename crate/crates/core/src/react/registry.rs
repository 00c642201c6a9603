use thiserror::Error;

/// A named operation an agent can invoke by writing `Action: <name>`.
///
/// `C` is the per-turn context the tool reads and mutates. Failures are
/// returned as observation text so the model can react to them.
pub trait Tool<C: ?Sized>: Send + Sync {
    fn name(&self) -> &str;

    /// Usage text shown to the model; may depend on the current context.
    fn description(&self, ctx: &C) -> String;

    fn run(&self, ctx: &mut C, input: &str) -> String;
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("a tool named {0} is already registered")]
    Duplicate(String),
    #[error("the tool registry is empty")]
    Empty,
    #[error("tool {0} has an empty description")]
    EmptyDescription(String),
}

/// `{tools}` and `{tool_names}` prompt bindings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToolCatalog {
    pub tools: String,
    pub tool_names: String,
}

pub struct Registry<C: ?Sized> {
    tools: Vec<Box<dyn Tool<C>>>,
}

impl<C: ?Sized> Default for Registry<C> {
    fn default() -> Self {
        Self { tools: Vec::new() }
    }
}

impl<C: ?Sized> Registry<C> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, tool: impl Tool<C> + 'static) -> Result<(), RegistryError> {
        if self.tools.iter().any(|t| t.name() == tool.name()) {
            return Err(RegistryError::Duplicate(tool.name().to_string()));
        }
        self.tools.push(Box::new(tool));
        Ok(())
    }

    pub fn with(mut self, tool: impl Tool<C> + 'static) -> Result<Self, RegistryError> {
        self.register(tool)?;
        Ok(self)
    }

    pub fn names(&self) -> Vec<&str> {
        self.tools.iter().map(|t| t.name()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }

    /// Looks a tool up by exact name, then case-insensitively.
    pub fn get(&self, name: &str) -> Option<&dyn Tool<C>> {
        self.tools
            .iter()
            .find(|t| t.name() == name)
            .or_else(|| self.tools.iter().find(|t| t.name().eq_ignore_ascii_case(name)))
            .map(|t| t.as_ref())
    }

    /// One `name: description` line per tool in registration order, plus the
    /// comma-separated names.
    pub fn render_catalog(&self, ctx: &C) -> Result<ToolCatalog, RegistryError> {
        if self.tools.is_empty() {
            return Err(RegistryError::Empty);
        }
        let mut lines = Vec::with_capacity(self.tools.len());
        for t in &self.tools {
            let d = t.description(ctx);
            if d.trim().is_empty() {
                return Err(RegistryError::EmptyDescription(t.name().to_string()));
            }
            lines.push(format!("{}: {}", t.name(), d));
        }
        Ok(ToolCatalog {
            tools: lines.join("\n"),
            tool_names: self.names().join(", "),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Named(&'static str);

    impl Tool<()> for Named {
        fn name(&self) -> &str {
            self.0
        }
        fn description(&self, _: &()) -> String {
            format!("does {}", self.0)
        }
        fn run(&self, _: &mut (), _: &str) -> String {
            String::new()
        }
    }

    #[test]
    fn catalog_keeps_registration_order() {
        let r = Registry::new()
            .with(Named("Battle"))
            .and_then(|r| r.with(Named("WoundCharacter")))
            .and_then(|r| r.with(Named("HealCharacter")))
            .unwrap();
        let c = r.render_catalog(&()).unwrap();
        assert_eq!(c.tool_names, "Battle, WoundCharacter, HealCharacter");
        assert_eq!(c.tools.lines().next(), Some("Battle: does Battle"));
    }

    #[test]
    fn empty_and_duplicate_registries_are_rejected() {
        assert_eq!(Registry::<()>::new().render_catalog(&()), Err(RegistryError::Empty));
        let mut r = Registry::new();
        r.register(Named("A")).unwrap();
        assert!(matches!(r.register(Named("A")), Err(RegistryError::Duplicate(_))));
        assert!(r.get("a").is_some());
    }
}
