"""Exception types shared across the toolkit."""


class TeamCoverError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(TeamCoverError):
    """An instance, deployment, or configuration violates its contract."""


class DeploymentError(ValidationError):
    """A deployment violates a resource or coupling constraint."""


class GuardError(TeamCoverError):
    """A solver size guard refused an oversized input."""
