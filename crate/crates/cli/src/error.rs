use grounded_chi::dist2::Dist2Error;
use grounded_chi::generate::GenerateError;
use grounded_chi::graph::GraphError;
use grounded_chi::io::LoadError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(#[from] LoadError),
    #[error("{0}")]
    Generate(#[from] GenerateError),
    #[error("{0}")]
    Budget(GraphError),
    #[error("{0}")]
    Graph(GraphError),
    #[error("{0}")]
    Pipeline(#[from] Dist2Error),
    #[error("{failed} of {total} instances failed")]
    AuditFailed { failed: usize, total: usize },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::BudgetExceeded { .. } => CliError::Budget(e),
            other => CliError::Graph(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Generate(GenerateError::BudgetExceeded { .. }) => 3,
            CliError::Generate(_) => 2,
            CliError::Budget(_) => 4,
            CliError::Pipeline(e) if budget_inside(e) => 4,
            CliError::Graph(_) | CliError::Pipeline(_) | CliError::AuditFailed { .. } | CliError::Write { .. } => 1,
        }
    }
}

fn budget_inside(e: &Dist2Error) -> bool {
    match e {
        Dist2Error::Graph(GraphError::BudgetExceeded { .. }) => true,
        Dist2Error::Stage { source, .. } => budget_inside(source),
        _ => false,
    }
}

pub fn write_file(path: &std::path::Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_budget_maps_to_four() {
        let e = GraphError::BudgetExceeded { limit: 1 };
        assert_eq!(CliError::from(e.clone()).exit_code(), 4);
        let staged = Dist2Error::Stage { stage: "left oracle", source: Box::new(Dist2Error::Graph(e)) };
        assert_eq!(CliError::from(staged).exit_code(), 4);
        assert_eq!(CliError::from(GenerateError::BudgetExceeded { member: 0, attempts: 1 }).exit_code(), 3);
        assert_eq!(CliError::AuditFailed { failed: 1, total: 2 }.exit_code(), 1);
    }
}
