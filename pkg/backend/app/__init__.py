"""Job-shop scheduling by tabu search and path relinking."""

__version__ = "0.1.0"
