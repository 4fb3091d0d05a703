"""BDD step definitions package."""


