"""soquet: query object-oriented program facts for crosscutting-concern
instances and organize them into persisted concern models."""

from .facts import (
    Entity, Fact, FactStore, FactStoreBuilder, Location, entity_id,
    import_facts, parse_entity_id,
)
from .virtuals import VirtualInterface, define_virtual_interface

__version__ = "0.1.0"

__all__ = [
    "Entity", "Fact", "FactStore", "FactStoreBuilder", "Location",
    "VirtualInterface", "define_virtual_interface", "entity_id",
    "import_facts", "parse_entity_id",
]
