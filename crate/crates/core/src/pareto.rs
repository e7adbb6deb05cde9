//! Campaign driver.
