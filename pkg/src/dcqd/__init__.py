"""`dcqd` simulates and verifies direct characterization of quantum dynamics for prime-d qudits"""
__version__ = "0.4.1"
