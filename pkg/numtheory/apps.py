from django.apps import AppConfig


class NumtheoryConfig(AppConfig):
    name = 'numtheory'
    verbose_name = 'Exact arithmetic and p-adic analysis'
