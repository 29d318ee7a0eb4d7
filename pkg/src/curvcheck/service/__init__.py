"""Request/response layer shared by the HTTP service and the CLI."""
