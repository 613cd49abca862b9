// placeholder until the core API is complete
