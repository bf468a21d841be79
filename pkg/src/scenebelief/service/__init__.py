"""HTTP session service: event-sourced interactive sessions for the UI."""
