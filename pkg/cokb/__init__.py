"""Knowledge-base grounded answering for black-box LLMs."""

__version__ = '0.1'
