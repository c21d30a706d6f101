# src package
