"""Clinical workstation for conducting the Hammersmith Infant Neurological
Examination: skeleton extraction pipeline, examination catalogs, patient
records, media storage and the examiner gateway."""

__version__ = "0.1.0"
